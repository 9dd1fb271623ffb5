#ifndef MCEST_SIMULATOR_HPP
#define MCEST_SIMULATOR_HPP

#include "mcest/simulator/config.hpp"
#include "mcest/simulator/dynamics.hpp"
#include "mcest/simulator/ensemble.hpp"
#include "mcest/simulator/realization.hpp"

#endif  // MCEST_SIMULATOR_HPP
