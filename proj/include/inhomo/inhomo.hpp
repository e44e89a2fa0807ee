#pragma once

#include "inhomo/asymptotics.hpp"
#include "inhomo/errors.hpp"
#include "inhomo/exact.hpp"
#include "inhomo/forest.hpp"
#include "inhomo/model.hpp"
#include "inhomo/model_json.hpp"
#include "inhomo/oracle.hpp"
#include "inhomo/potential.hpp"
#include "inhomo/rational.hpp"
#include "inhomo/series.hpp"
