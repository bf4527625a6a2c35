#pragma once

#include "ctqw/compare.hpp"
#include "ctqw/config.hpp"
#include "ctqw/dataset.hpp"
#include "ctqw/discretize.hpp"
#include "ctqw/error.hpp"
#include "ctqw/evolve.hpp"
#include "ctqw/matrix.hpp"
#include "ctqw/pipeline.hpp"
#include "ctqw/spectral.hpp"
#include "ctqw/surrogate.hpp"
