#pragma once

// Umbrella header for the library proper. The HTTP binding (edgar/http.hpp)
// and the test oracles (edgar/synth/*) are included separately.

#include "edgar/config.hpp"
#include "edgar/curie.hpp"
#include "edgar/error.hpp"
#include "edgar/ontology.hpp"
#include "edgar/parallel.hpp"
#include "edgar/pipeline.hpp"
#include "edgar/query.hpp"
#include "edgar/records.hpp"
#include "edgar/resolver.hpp"
#include "edgar/result.hpp"
#include "edgar/service.hpp"
#include "edgar/stats.hpp"
#include "edgar/store.hpp"
