#pragma once

#include "dmlpg/assembly.hpp"
#include "dmlpg/config.hpp"
#include "dmlpg/driver.hpp"
#include "dmlpg/errors.hpp"
#include "dmlpg/geometry.hpp"
#include "dmlpg/gmls.hpp"
#include "dmlpg/heat_problem.hpp"
#include "dmlpg/node_set.hpp"
#include "dmlpg/poly_basis.hpp"
#include "dmlpg/problems.hpp"
#include "dmlpg/quadrature.hpp"
#include "dmlpg/studies.hpp"
#include "dmlpg/subdomain.hpp"
#include "dmlpg/time_stepping.hpp"
#include "dmlpg/weak_forms.hpp"
