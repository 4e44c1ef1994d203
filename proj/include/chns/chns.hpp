#pragma once

#include "chns/assembly.hpp"
#include "chns/config.hpp"
#include "chns/csv.hpp"
#include "chns/diagnostics.hpp"
#include "chns/gronwall.hpp"
#include "chns/mesh.hpp"
#include "chns/mms.hpp"
#include "chns/operators.hpp"
#include "chns/params.hpp"
#include "chns/projections.hpp"
#include "chns/quadrature.hpp"
#include "chns/runner.hpp"
#include "chns/scheme.hpp"
#include "chns/solver.hpp"
#include "chns/space.hpp"
#include "chns/study.hpp"
#include "chns/vtk.hpp"
