/* * * * * * * * * * * * * * * * * * * * * * * * * * * * * * * * * * * * * * */
/*                                                                           */
/*  pscp -- branch-and-Benders-cut for probabilistic set covering            */
/*                                                                           */
/*  Licensed under the Apache License, Version 2.0 (the "License");          */
/*  you may not use this file except in compliance with the License.         */
/*  You may obtain a copy of the License at                                  */
/*                                                                           */
/*      http://www.apache.org/licenses/LICENSE-2.0                           */
/*                                                                           */
/*  Unless required by applicable law or agreed to in writing, software      */
/*  distributed under the License is distributed on an "AS IS" BASIS,        */
/*  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. */
/*  See the License for the specific language governing permissions and      */
/*  limitations under the License.                                           */
/*                                                                           */
/* * * * * * * * * * * * * * * * * * * * * * * * * * * * * * * * * * * * * * */

#ifndef PSCP_PSCP_HPP
#define PSCP_PSCP_HPP

#include "pscp/common.hpp"
#include "pscp/cuts.hpp"
#include "pscp/instance.hpp"
#include "pscp/lp.hpp"
#include "pscp/oracle.hpp"
#include "pscp/rng.hpp"
#include "pscp/scenario_gen.hpp"
#include "pscp/solver.hpp"

#endif
