// Umbrella header for the schur_agler library.

#pragma once

#include "schur_agler/error.hpp"
#include "schur_agler/numerics.hpp"
#include "schur_agler/domains.hpp"
#include "schur_agler/kernels.hpp"
#include "schur_agler/pick.hpp"
#include "schur_agler/realization.hpp"
#include "schur_agler/herglotz.hpp"
#include "schur_agler/da_extremal.hpp"
#include "schur_agler/serialization.hpp"
