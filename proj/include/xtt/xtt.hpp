#pragma once

#include "xtt/analysis.hpp"
#include "xtt/bpmn.hpp"
#include "xtt/drools.hpp"
#include "xtt/inference.hpp"
#include "xtt/model.hpp"
#include "xtt/parse.hpp"
#include "xtt/validate.hpp"
