// Umbrella header.

#ifndef ERW_ERW_HPP
#define ERW_ERW_HPP

#include "erw/backward_bp.hpp"
#include "erw/cookie_env.hpp"
#include "erw/coupled_field.hpp"
#include "erw/coupling.hpp"
#include "erw/forward_bp.hpp"
#include "erw/harness.hpp"
#include "erw/parallel.hpp"
#include "erw/rng.hpp"
#include "erw/samplers.hpp"
#include "erw/stats.hpp"
#include "erw/trial_field.hpp"
#include "erw/trial_laws.hpp"
#include "erw/walk.hpp"

#endif  // ERW_ERW_HPP
