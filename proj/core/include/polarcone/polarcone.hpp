#pragma once

#include "polarcone/cone.hpp"
#include "polarcone/deformation.hpp"
#include "polarcone/error.hpp"
#include "polarcone/grid.hpp"
#include "polarcone/io.hpp"
#include "polarcone/stress.hpp"
#include "polarcone/symmetric.hpp"
