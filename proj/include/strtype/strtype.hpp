#pragma once

#include "strtype/utf8.hpp"
#include "strtype/pattern.hpp"
#include "strtype/parser.hpp"
#include "strtype/structures.hpp"
#include "strtype/safestring.hpp"
#include "strtype/builtins.hpp"
#include "strtype/ops.hpp"
