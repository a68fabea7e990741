#pragma once

#include "assembly.hpp"
#include "config.hpp"
#include "core.hpp"
#include "diagnostics.hpp"
#include "experiments.hpp"
#include "fields.hpp"
#include "geometry.hpp"
#include "manufactured.hpp"
#include "mesh.hpp"
#include "norms.hpp"
#include "quadrature.hpp"
#include "simulation.hpp"
#include "solver.hpp"
#include "sparse.hpp"
#include "timestepping.hpp"
#include "vtk.hpp"
