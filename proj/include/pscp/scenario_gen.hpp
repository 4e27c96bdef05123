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

#ifndef PSCP_SCENARIO_GEN_HPP
#define PSCP_SCENARIO_GEN_HPP

#include "pscp/instance.hpp"
#include "pscp/rng.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace pscp
{

enum class Distribution
{
   independent,
   mixture
};

struct GenConfig
{
   Distribution kind = Distribution::independent;
   /// scenarios per row; a single entry applies to every row
   std::vector<int> s{ 100 };
   double epsilon = 0.05;
   double dropout_hi = 0.4;
   int mixture_L = 50;
   std::uint64_t seed = 0;
   /// rows are generated by this many threads; output does not depend on it
   int workers = 1;

   int
   scenarios_for_row( int i ) const
   {
      return s.size() == 1 ? s[0] : s.at( i );
   }

   void
   check( int m ) const
   {
      if( s.empty() || ( s.size() != 1 && static_cast<int>( s.size() ) != m ) )
         throw std::invalid_argument( "scenario count list must have 1 or m "
                                      "entries" );
      for( int v : s )
         if( v < 1 )
            throw std::invalid_argument( "scenario count must be >= 1" );
      if( !( epsilon > 0.0 && epsilon < 1.0 ) )
         throw std::invalid_argument( "epsilon must lie in (0,1)" );
      if( !( dropout_hi >= 0.0 && dropout_hi <= 1.0 ) )
         throw std::invalid_argument( "dropout_hi must lie in [0,1]" );
      if( mixture_L < 1 )
         throw std::invalid_argument( "mixture component count must be >= 1" );
   }
};

/// Bernoulli mixture: a prior over L components and, per row and
/// component, one dropout probability per column of the deterministic row.
struct MixtureModel
{
   std::vector<double> priors;
   /// dropout[i][l][k] belongs to column scp.rows[i][k]
   std::vector<std::vector<std::vector<double>>> dropout;
};

namespace detail
{

inline std::vector<double>
draw_dropout( const GenConfig& cfg, int row, int component, std::size_t count )
{
   Stream st = make_stream( cfg.seed, StreamTag::dropout, row, component );
   std::vector<double> p( count );
   for( double& v : p )
      v = st.uniform( cfg.dropout_hi );
   return p;
}

/// One scenario: keep column k unless the uniform draw is strictly below
/// its dropout probability.
inline std::vector<int>
draw_scenario( const GenConfig& cfg, int row, int scenario,
               const std::vector<int>& support,
               const std::vector<double>& dropout )
{
   Stream st = make_stream( cfg.seed, StreamTag::scenario, row, scenario );
   std::vector<int> out;
   out.reserve( support.size() );
   for( std::size_t k = 0; k < support.size(); ++k )
      if( !( st.uniform() < dropout[k] ) )
         out.push_back( support[k] );
   return out;
}

template <typename RowFn>
void
for_each_row( int m, int workers, RowFn&& fn )
{
   workers = std::max( 1, std::min( workers, m ) );
   if( workers == 1 )
   {
      for( int i = 0; i < m; ++i )
         fn( i );
      return;
   }
   std::vector<std::thread> pool;
   for( int w = 0; w < workers; ++w )
      pool.emplace_back( [&, w] {
         for( int i = w; i < m; i += workers )
            fn( i );
      } );
   for( auto& t : pool )
      t.join();
}

inline Instance
instance_shell( const DeterministicScp& scp, const GenConfig& cfg,
                const char* dist )
{
   Instance inst;
   inst.m = scp.m;
   inst.n = scp.n;
   inst.cost.assign( scp.cost.begin(), scp.cost.end() );
   inst.blocks.resize( scp.m );
   inst.meta["dist"] = dist;
   inst.meta["seed"] = std::to_string( cfg.seed );
   inst.meta["eps"] = format_double( cfg.epsilon );
   inst.meta["dropout_hi"] = format_double( cfg.dropout_hi );
   std::string s;
   for( std::size_t k = 0; k < cfg.s.size(); ++k )
      s += ( k ? "," : "" ) + std::to_string( cfg.s[k] );
   inst.meta["s"] = s;
   return inst;
}

} // namespace detail

/// Independent Bernoulli dropout: every column of the deterministic row
/// disappears with its own probability drawn once per (row, column).
inline Instance
gen_independent( const DeterministicScp& scp, const GenConfig& cfg )
{
   cfg.check( scp.m );
   Instance inst = detail::instance_shell( scp, cfg, "indep" );
   detail::for_each_row( scp.m, cfg.workers, [&]( int i ) {
      const auto& support = scp.rows[i];
      auto dropout = detail::draw_dropout( cfg, i, 0, support.size() );
      int s = cfg.scenarios_for_row( i );
      std::vector<std::vector<int>> scenarios( s );
      for( int w = 0; w < s; ++w )
         scenarios[w] = detail::draw_scenario( cfg, i, w, support, dropout );
      inst.blocks[i] = make_block( scp.n, std::move( scenarios ),
                                   std::vector<double>( s, 1.0 / s ),
                                   cfg.epsilon );
   } );
   return inst;
}

/// Priors and per-component dropout probabilities. Component 0 of each row
/// uses the same stream as gen_independent, so L = 1 reproduces it.
inline MixtureModel
gen_mixture_model( const DeterministicScp& scp, const GenConfig& cfg )
{
   MixtureModel model;
   Stream prior = make_stream( cfg.seed, StreamTag::prior );
   model.priors.resize( cfg.mixture_L );
   double sum = 0.0;
   for( double& v : model.priors )
   {
      v = prior.uniform();
      sum += v;
   }
   for( double& v : model.priors )
      v = sum > 0.0 ? v / sum : 1.0 / cfg.mixture_L;

   model.dropout.resize( scp.m );
   for( int i = 0; i < scp.m; ++i )
   {
      model.dropout[i].resize( cfg.mixture_L );
      for( int l = 0; l < cfg.mixture_L; ++l )
         model.dropout[i][l] =
             detail::draw_dropout( cfg, i, l, scp.rows[i].size() );
   }
   return model;
}

/// Index of the component selected by a uniform draw u in [0,1).
inline int
sample_component( const std::vector<double>& priors, double u )
{
   double acc = 0.0;
   for( std::size_t l = 0; l + 1 < priors.size(); ++l )
   {
      acc += priors[l];
      if( u < acc )
         return static_cast<int>( l );
   }
   return static_cast<int>( priors.size() ) - 1;
}

/// Bernoulli mixture: each scenario first picks a component from the
/// prior, then drops columns independently with that component's
/// probabilities.
inline Instance
gen_mixture( const DeterministicScp& scp, const GenConfig& cfg )
{
   cfg.check( scp.m );
   Instance inst = detail::instance_shell( scp, cfg, "mixture" );
   inst.meta["L"] = std::to_string( cfg.mixture_L );
   MixtureModel model = gen_mixture_model( scp, cfg );
   detail::for_each_row( scp.m, cfg.workers, [&]( int i ) {
      const auto& support = scp.rows[i];
      int s = cfg.scenarios_for_row( i );
      std::vector<std::vector<int>> scenarios( s );
      for( int w = 0; w < s; ++w )
      {
         Stream pick = make_stream( cfg.seed, StreamTag::component, i, w );
         int l = sample_component( model.priors, pick.uniform() );
         scenarios[w] = detail::draw_scenario( cfg, i, w, support,
                                               model.dropout[i][l] );
      }
      inst.blocks[i] = make_block( scp.n, std::move( scenarios ),
                                   std::vector<double>( s, 1.0 / s ),
                                   cfg.epsilon );
   } );
   return inst;
}

inline Instance
generate( const DeterministicScp& scp, const GenConfig& cfg )
{
   return cfg.kind == Distribution::independent ? gen_independent( scp, cfg )
                                                : gen_mixture( scp, cfg );
}

} // namespace pscp

#endif
