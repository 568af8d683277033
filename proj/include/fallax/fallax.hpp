#pragma once

// Umbrella header: pulls in the whole library.

#include "fallax/agreement.hpp"
#include "fallax/analysis.hpp"
#include "fallax/assignment.hpp"
#include "fallax/conll.hpp"
#include "fallax/corpus.hpp"
#include "fallax/generate.hpp"
#include "fallax/label.hpp"
#include "fallax/records.hpp"
#include "fallax/report.hpp"
#include "fallax/rng.hpp"
#include "fallax/scoring.hpp"
#include "fallax/splits.hpp"
#include "fallax/taxonomy.hpp"
#include "fallax/validate.hpp"
#include "fallax/violation.hpp"
