#pragma once

// Umbrella header: analytic wave-packet reflection, difference-function
// zeros, and time-domain modulus-phase reciprocal relations.

#include "wavekk/core.hpp"
#include "wavekk/diff_fn.hpp"
#include "wavekk/kk.hpp"
#include "wavekk/quadrature.hpp"
#include "wavekk/scenarios.hpp"
#include "wavekk/wavepacket.hpp"
#include "wavekk/zeros.hpp"
