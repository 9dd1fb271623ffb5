#ifndef MCEST_CHANNEL_HPP
#define MCEST_CHANNEL_HPP

#include "mcest/channel/cir.hpp"
#include "mcest/channel/hitting.hpp"
#include "mcest/channel/params.hpp"
#include "mcest/channel/volterra.hpp"

#endif  // MCEST_CHANNEL_HPP
