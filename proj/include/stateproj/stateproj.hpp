#pragma once

#include "stateproj/core.hpp"
#include "stateproj/label_io.hpp"
#include "stateproj/measures.hpp"
#include "stateproj/oracle.hpp"
#include "stateproj/projection.hpp"
#include "stateproj/simulate.hpp"
