#pragma once

#include "repomech/accounting.hpp"
#include "repomech/book_io.hpp"
#include "repomech/ccp.hpp"
#include "repomech/decimal.hpp"
#include "repomech/decomposition.hpp"
#include "repomech/econ.hpp"
#include "repomech/errors.hpp"
#include "repomech/flow_network.hpp"
#include "repomech/generator.hpp"
#include "repomech/json_report.hpp"
#include "repomech/netting.hpp"
#include "repomech/pipeline.hpp"
#include "repomech/settlement.hpp"
#include "repomech/split.hpp"
#include "repomech/trade.hpp"
