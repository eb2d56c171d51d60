// Everything at once.
#pragma once

#include "diffeo/core.hpp"
#include "diffeo/euclid.hpp"
#include "diffeo/diffeology.hpp"
#include "diffeo/groupoid.hpp"
#include "diffeo/bundleclass.hpp"
#include "diffeo/sheaf.hpp"
#include "diffeo/forms.hpp"
#include "diffeo/catalog.hpp"
#include "diffeo/tables.hpp"
#include "diffeo/scenario.hpp"
