#pragma once

#include "persp/core.hpp"
#include "persp/discrete.hpp"
#include "persp/harness.hpp"
#include "persp/hull.hpp"
#include "persp/io.hpp"
#include "persp/robust.hpp"
