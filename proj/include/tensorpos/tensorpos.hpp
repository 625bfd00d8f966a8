#pragma once

#include "tensorpos/construct.hpp"
#include "tensorpos/errors.hpp"
#include "tensorpos/io.hpp"
#include "tensorpos/linalg.hpp"
#include "tensorpos/model.hpp"
#include "tensorpos/norms.hpp"
#include "tensorpos/random.hpp"
