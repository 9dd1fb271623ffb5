#ifndef MCEST_INFERENCE_HPP
#define MCEST_INFERENCE_HPP

#include "mcest/inference/estimators.hpp"
#include "mcest/inference/fisher.hpp"
#include "mcest/inference/gamma.hpp"
#include "mcest/inference/mse.hpp"
#include "mcest/inference/observations.hpp"
#include "mcest/inference/problem.hpp"
#include "mcest/inference/skellam.hpp"

#endif  // MCEST_INFERENCE_HPP
