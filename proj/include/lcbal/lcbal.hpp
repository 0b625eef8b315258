#pragma once

// Umbrella header.

#include "lcbal/bench.hpp"
#include "lcbal/dataset.hpp"
#include "lcbal/estimator.hpp"
#include "lcbal/hypothesis.hpp"
#include "lcbal/learners.hpp"
#include "lcbal/loss.hpp"
#include "lcbal/metrics.hpp"
#include "lcbal/optimizer.hpp"
#include "lcbal/rng.hpp"
#include "lcbal/sampler.hpp"
