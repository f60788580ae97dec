#pragma once
#include "pcf/builtins.hpp"
#include "pcf/contour.hpp"
#include "pcf/dynamics.hpp"
#include "pcf/error.hpp"
#include "pcf/grassmann.hpp"
#include "pcf/io.hpp"
#include "pcf/linalg.hpp"
#include "pcf/multipoly.hpp"
#include "pcf/operator.hpp"
#include "pcf/poly.hpp"
#include "pcf/qmatrix.hpp"
#include "pcf/renorm.hpp"
#include "pcf/schur.hpp"
#include "pcf/spectral.hpp"
#include "pcf/structure.hpp"
