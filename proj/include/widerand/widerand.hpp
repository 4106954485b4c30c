#pragma once

#include "widerand/combiner.hpp"
#include "widerand/error.hpp"
#include "widerand/generator.hpp"
#include "widerand/io.hpp"
#include "widerand/resolution.hpp"
#include "widerand/sources.hpp"
#include "widerand/stats.hpp"
