#pragma once

#include "lta/cooccurrence.hpp"
#include "lta/edit_distance.hpp"
#include "lta/embedding.hpp"
#include "lta/errors.hpp"
#include "lta/eval.hpp"
#include "lta/grid.hpp"
#include "lta/grpo.hpp"
#include "lta/rewards.hpp"
#include "lta/rng.hpp"
#include "lta/structured.hpp"
#include "lta/synthetic.hpp"
#include "lta/toy_policy.hpp"
#include "lta/vocab.hpp"
