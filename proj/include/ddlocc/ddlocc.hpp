#pragma once

#include "ddlocc/applications.hpp"
#include "ddlocc/constants.hpp"
#include "ddlocc/dd_solver.hpp"
#include "ddlocc/dimensions.hpp"
#include "ddlocc/errors.hpp"
#include "ddlocc/finite_diff.hpp"
#include "ddlocc/joint_diag.hpp"
#include "ddlocc/json_io.hpp"
#include "ddlocc/lie_groups.hpp"
#include "ddlocc/linalg.hpp"
#include "ddlocc/protocol.hpp"
#include "ddlocc/verify.hpp"
