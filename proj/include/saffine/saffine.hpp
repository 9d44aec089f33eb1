#pragma once

#include "saffine/error.hpp"
#include "saffine/linalg.hpp"
#include "saffine/word.hpp"
#include "saffine/polygon.hpp"
#include "saffine/system.hpp"
#include "saffine/expansion.hpp"
#include "saffine/hull.hpp"
#include "saffine/membership.hpp"
#include "saffine/uniqueness.hpp"
#include "saffine/render.hpp"
#include "saffine/io.hpp"
