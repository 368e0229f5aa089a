#pragma once

#include <qmem/baselines.hpp>
#include <qmem/commands.hpp>
#include <qmem/encoding.hpp>
#include <qmem/error.hpp>
#include <qmem/hyperopt.hpp>
#include <qmem/io.hpp>
#include <qmem/memristor.hpp>
#include <qmem/optics.hpp>
#include <qmem/parallel.hpp>
#include <qmem/readout.hpp>
#include <qmem/report.hpp>
#include <qmem/reservoir.hpp>
#include <qmem/stats.hpp>
#include <qmem/tasks.hpp>
#include <qmem/tomography.hpp>
