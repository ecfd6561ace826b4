#pragma once

#include "dendrix/error.hpp"
#include "dendrix/sequences.hpp"
#include "dendrix/spaces.hpp"
#include "dendrix/cells.hpp"
#include "dendrix/dendrite.hpp"
#include "dendrix/extension.hpp"
#include "dendrix/odometer.hpp"
#include "dendrix/chaos.hpp"
