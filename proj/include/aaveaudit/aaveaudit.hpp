#pragma once

// Umbrella header.

#include "annotate.hpp"
#include "audit.hpp"
#include "corpus.hpp"
#include "ddm.hpp"
#include "emoji.hpp"
#include "error.hpp"
#include "features.hpp"
#include "geo.hpp"
#include "labels.hpp"
#include "stats/agreement.hpp"
#include "stats/confusion.hpp"
#include "stats/descriptive.hpp"
#include "stats/ols.hpp"
#include "stats/special.hpp"
#include "taxonomy.hpp"
