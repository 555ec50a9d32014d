#pragma once

#include "condlogic/context.hpp"
#include "condlogic/dataset_io.hpp"
#include "condlogic/dsl.hpp"
#include "condlogic/error.hpp"
#include "condlogic/evaluate.hpp"
#include "condlogic/generator.hpp"
#include "condlogic/logic.hpp"
#include "condlogic/metrics.hpp"
#include "condlogic/nli_bank.hpp"
#include "condlogic/seed.hpp"
#include "condlogic/template.hpp"
