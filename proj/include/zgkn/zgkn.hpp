#pragma once

#include "zgkn/errors.hpp"
#include "zgkn/model.hpp"
#include "zgkn/ode.hpp"
#include "zgkn/flows.hpp"
#include "zgkn/orbits.hpp"
#include "zgkn/eigenmaps.hpp"
#include "zgkn/parallel.hpp"
#include "zgkn/spectrum.hpp"
#include "zgkn/wavefunction.hpp"
#include "zgkn/validate.hpp"
#include "zgkn/io.hpp"
#include "zgkn/cli.hpp"
