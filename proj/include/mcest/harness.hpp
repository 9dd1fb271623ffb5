#ifndef MCEST_HARNESS_HPP
#define MCEST_HARNESS_HPP

#include "mcest/harness/commands.hpp"
#include "mcest/harness/config.hpp"
#include "mcest/harness/csv.hpp"
#include "mcest/harness/manifest.hpp"
#include "mcest/harness/plateau.hpp"

#endif  // MCEST_HARNESS_HPP
