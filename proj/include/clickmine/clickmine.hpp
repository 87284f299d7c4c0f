#pragma once
#ifndef CLICKMINE_CLICKMINE_HPP
#define CLICKMINE_CLICKMINE_HPP

#include "clickmine/action_map.hpp"
#include "clickmine/cluster.hpp"
#include "clickmine/compare.hpp"
#include "clickmine/defaults.hpp"
#include "clickmine/error.hpp"
#include "clickmine/features.hpp"
#include "clickmine/io.hpp"
#include "clickmine/log_ingest.hpp"
#include "clickmine/markov.hpp"
#include "clickmine/pca.hpp"
#include "clickmine/pipeline.hpp"
#include "clickmine/sessions.hpp"
#include "clickmine/synth.hpp"

#endif  // CLICKMINE_CLICKMINE_HPP
