#ifndef MCEST_NUMERICS_HPP
#define MCEST_NUMERICS_HPP

#include "mcest/numerics/bessel.hpp"
#include "mcest/numerics/diff.hpp"
#include "mcest/numerics/erfcx.hpp"
#include "mcest/numerics/quadrature.hpp"
#include "mcest/numerics/roots.hpp"

#endif  // MCEST_NUMERICS_HPP
