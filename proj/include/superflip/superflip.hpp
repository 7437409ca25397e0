#pragma once

#include "grassmann.hpp"
#include "identity.hpp"
#include "markoff.hpp"
#include "osp12.hpp"
#include "state.hpp"
#include "torus.hpp"
