#pragma once

#include "rational.hpp"
#include "errors.hpp"
#include "timed_string.hpp"
#include "constraint.hpp"
#include "exclusivity.hpp"
#include "guard_syntax.hpp"
#include "automaton.hpp"
#include "simulate.hpp"
#include "determinism.hpp"
#include "pair_set.hpp"
#include "pair_oracle.hpp"
#include "determinize.hpp"
#include "random.hpp"
#include "witness.hpp"
#include "serialization.hpp"
#include "commands.hpp"
