#pragma once

#include "eagertl/model.hpp"
#include "eagertl/closure.hpp"
#include "eagertl/allen.hpp"
#include "eagertl/oracle.hpp"
#include "eagertl/word.hpp"
#include "eagertl/plan_automaton.hpp"
#include "eagertl/rule_automaton.hpp"
#include "eagertl/solver.hpp"
#include "eagertl/lowerbound.hpp"
#include "eagertl/bpmn.hpp"
#include "eagertl/dsl.hpp"
