#pragma once

#include "ddc/descriptor.hpp"
#include "ddc/errors.hpp"
#include "ddc/excitation.hpp"
#include "ddc/hankel.hpp"
#include "ddc/io.hpp"
#include "ddc/linalg.hpp"
#include "ddc/mpc.hpp"
#include "ddc/ocp.hpp"
#include "ddc/presets.hpp"
#include "ddc/qp.hpp"
#include "ddc/quasi_weierstrass.hpp"
#include "ddc/simulation.hpp"
#include "ddc/trajectory.hpp"
