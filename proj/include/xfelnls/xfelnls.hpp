#pragma once

// Umbrella header: everything the library provides.

#include "errors.hpp"
#include "grid.hpp"
#include "field.hpp"
#include "fourier.hpp"
#include "snapshot_io.hpp"
#include "quadrature.hpp"
#include "beam_path.hpp"
#include "model.hpp"
#include "nonlinearity.hpp"
#include "integrator.hpp"
#include "norms.hpp"
#include "averaging.hpp"
#include "config.hpp"
#include "run_config.hpp"
#include "artifacts.hpp"
#include "commands.hpp"
