#pragma once

#include "pwsreg/analysis.hpp"
#include "pwsreg/errors.hpp"
#include "pwsreg/expr.hpp"
#include "pwsreg/fields.hpp"
#include "pwsreg/integrate.hpp"
#include "pwsreg/io.hpp"
#include "pwsreg/maps.hpp"
#include "pwsreg/regularize.hpp"
#include "pwsreg/scenarios.hpp"
#include "pwsreg/types.hpp"
