#pragma once

#include "ltswap/agreement.hpp"
#include "ltswap/bins.hpp"
#include "ltswap/blimp.hpp"
#include "ltswap/corpus.hpp"
#include "ltswap/digest.hpp"
#include "ltswap/error.hpp"
#include "ltswap/feasibility.hpp"
#include "ltswap/forge.hpp"
#include "ltswap/generation.hpp"
#include "ltswap/io.hpp"
#include "ltswap/lexicon.hpp"
#include "ltswap/llm/answer.hpp"
#include "ltswap/llm/backend.hpp"
#include "ltswap/llm/gateway.hpp"
#include "ltswap/llm/mock.hpp"
#include "ltswap/llm/templates.hpp"
#include "ltswap/metrics.hpp"
#include "ltswap/morphology.hpp"
#include "ltswap/pipeline/config.hpp"
#include "ltswap/pipeline/manifest.hpp"
#include "ltswap/pipeline/stages.hpp"
#include "ltswap/pos.hpp"
#include "ltswap/quadruplet.hpp"
#include "ltswap/report.hpp"
#include "ltswap/scoring.hpp"
#include "ltswap/synthetic.hpp"
#include "ltswap/tagger.hpp"
#include "ltswap/text.hpp"
