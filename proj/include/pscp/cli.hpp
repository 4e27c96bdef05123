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

#ifndef PSCP_CLI_HPP
#define PSCP_CLI_HPP

#include "pscp/instance.hpp"
#include "pscp/oracle.hpp"
#include "pscp/scenario_gen.hpp"
#include "pscp/solver.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace pscp::cli
{

using json = nlohmann::ordered_json;

inline constexpr int schema_version = 1;

enum ExitCode
{
   exit_ok = 0,
   exit_error = 1,
   exit_infeasible = 2,
   exit_limit = 3
};

inline int
exit_code_for( SolveStatus s )
{
   switch( s )
   {
   case SolveStatus::optimal:
   case SolveStatus::feasible:
      return exit_ok;
   case SolveStatus::infeasible:
      return exit_infeasible;
   case SolveStatus::limit:
      return exit_limit;
   }
   return exit_error;
}

inline std::string
read_file( const std::string& path )
{
   std::ifstream in( path, std::ios::binary );
   if( !in )
      throw std::runtime_error( "cannot read " + path );
   std::ostringstream ss;
   ss << in.rdbuf();
   return ss.str();
}

inline void
write_file( const std::string& path, const std::string& text )
{
   std::ofstream out( path, std::ios::binary );
   if( !out || !( out << text ) )
      throw std::runtime_error( "cannot write " + path );
}

inline std::string
instance_name( const std::string& path )
{
   return std::filesystem::path( path ).stem().string();
}

/// Finite numbers as-is, everything else as null.
inline json
number( double v )
{
   return std::isfinite( v ) ? json( v ) : json( nullptr );
}

inline std::string
bitstring( const std::vector<int>& x )
{
   std::string s;
   for( int v : x )
      s.push_back( v ? '1' : '0' );
   return s;
}

inline json
config_json( const SolverConfig& c )
{
   json j;
   j["mode"] = c.mode == SeparationMode::bd ? "bd" : "rbd";
   j["initial_cuts"] = c.use_initial_cuts;
   j["mir"] = c.use_mir;
   j["rens"] = c.use_rens;
   j["theta"] = c.rens_theta;
   j["time_limit"] = number( c.time_limit_s );
   j["node_limit"] = c.node_limit == std::numeric_limits<long>::max()
                         ? json( nullptr )
                         : json( c.node_limit );
   j["gap_tol"] = c.gap_tol;
   return j;
}

/// Reads solver settings from a manifest entry, keeping defaults for absent
/// keys.
inline SolverConfig
config_from_json( const json& j, SolverConfig c = {} )
{
   if( j.contains( "mode" ) )
   {
      std::string m = j["mode"].get<std::string>();
      if( m != "bd" && m != "rbd" )
         throw std::invalid_argument( "mode must be bd or rbd" );
      c.mode = m == "bd" ? SeparationMode::bd : SeparationMode::rbd;
   }
   if( j.contains( "initial_cuts" ) )
      c.use_initial_cuts = j["initial_cuts"].get<bool>();
   if( j.contains( "mir" ) )
      c.use_mir = j["mir"].get<bool>();
   if( j.contains( "rens" ) )
      c.use_rens = j["rens"].get<bool>();
   if( j.contains( "theta" ) )
      c.rens_theta = j["theta"].get<double>();
   if( j.contains( "time_limit" ) && !j["time_limit"].is_null() )
      c.time_limit_s = j["time_limit"].get<double>();
   if( j.contains( "node_limit" ) && !j["node_limit"].is_null() )
      c.node_limit = j["node_limit"].get<long>();
   if( j.contains( "gap_tol" ) )
      c.gap_tol = j["gap_tol"].get<double>();
   if( j.contains( "reference" ) && !j["reference"].is_null() )
      c.reference_objective = j["reference"].get<double>();
   c.check();
   return c;
}

/// One run record. Wall-time fields are the only nondeterministic ones.
inline json
run_record( const std::string& name, const std::string& config_name,
            const SolverConfig& cfg, const SolveReport& r )
{
   json j;
   j["schema"] = schema_version;
   j["kind"] = "run";
   j["instance"] = name;
   if( !config_name.empty() )
      j["config_name"] = config_name;
   j["config"] = config_json( cfg );
   j["status"] = to_string( r.status );
   j["objective"] = r.has_incumbent() ? json( r.objective ) : json( nullptr );
   j["bound"] = number( r.bound );
   j["end_gap"] = r.has_incumbent() ? number( r.end_gap ) : json( nullptr );
   j["root_bound"] = number( r.root_bound );
   j["root_gap"] = r.has_incumbent() ? number( r.root_gap ) : json( nullptr );
   j["nodes"] = r.nodes;
   j["cuts"] = { { "initial", r.cuts_initial },
                 { "benders", r.cuts_benders },
                 { "mir", r.cuts_mir } };
   if( r.rens.ran )
      j["rens"] = { { "objective", number( r.rens.objective ) },
                    { "fallback", r.rens.fallback },
                    { "nodes", r.rens.nodes },
                    { "primal_gap", r.rens.primal_gap
                                        ? json( *r.rens.primal_gap )
                                        : json( nullptr ) } };
   else
      j["rens"] = nullptr;
   j["x"] = bitstring( r.x );
   j["time_s"] = r.wall_time;
   j["separation_time_s"] = r.separation_time;
   return j;
}

inline json
error_record( const std::string& name, const std::string& config_name,
              const std::string& message )
{
   json j;
   j["schema"] = schema_version;
   j["kind"] = "run";
   j["instance"] = name;
   if( !config_name.empty() )
      j["config_name"] = config_name;
   j["status"] = "error";
   j["error"] = message;
   return j;
}

inline std::string
cell( const json& v, int precision = 6 )
{
   if( v.is_null() )
      return "-";
   if( v.is_number_float() )
   {
      std::ostringstream s;
      s << std::setprecision( precision ) << v.get<double>();
      return s.str();
   }
   if( v.is_string() )
      return v.get<std::string>();
   return v.dump();
}

inline std::string
pretty_header()
{
   std::ostringstream s;
   s << std::left << std::setw( 20 ) << "instance" << std::setw( 12 )
     << "config" << std::setw( 11 ) << "status" << std::right
     << std::setw( 12 ) << "objective" << std::setw( 12 ) << "bound"
     << std::setw( 9 ) << "gap%" << std::setw( 10 ) << "root%"
     << std::setw( 9 ) << "nodes" << std::setw( 10 ) << "time"
     << "\n";
   return s.str();
}

inline std::string
pretty_row( const json& rec )
{
   auto get = [&]( const char* k ) {
      return rec.contains( k ) ? rec[k] : json( nullptr );
   };
   std::ostringstream s;
   s << std::left << std::setw( 20 ) << cell( get( "instance" ) )
     << std::setw( 12 ) << cell( get( "config_name" ) ) << std::setw( 11 )
     << cell( get( "status" ) ) << std::right << std::setw( 12 )
     << cell( get( "objective" ) ) << std::setw( 12 )
     << cell( get( "bound" ) ) << std::setw( 9 )
     << cell( get( "end_gap" ), 3 ) << std::setw( 10 )
     << cell( get( "root_gap" ), 3 ) << std::setw( 9 )
     << cell( get( "nodes" ) ) << std::setw( 10 )
     << cell( get( "time_s" ), 3 ) << "\n";
   return s.str();
}

struct ProfilePoint
{
   double tau;
   double fraction;
};

/// Performance profile over `times[instance][config]`; entries that are not
/// finite count as unsolved. Points are emitted at every distinct finite
/// ratio to the per-instance best.
inline std::vector<std::vector<ProfilePoint>>
performance_profile( const std::vector<std::vector<double>>& times,
                     std::size_t num_configs )
{
   std::vector<std::vector<double>> ratios( num_configs );
   std::vector<double> taus;
   for( const auto& row : times )
   {
      double best = std::numeric_limits<double>::infinity();
      for( double t : row )
         if( std::isfinite( t ) )
            best = std::min( best, std::max( t, 1e-6 ) );
      for( std::size_t c = 0; c < num_configs; ++c )
      {
         double r = std::isfinite( row[c] ) && std::isfinite( best )
                        ? std::max( row[c], 1e-6 ) / best
                        : std::numeric_limits<double>::infinity();
         ratios[c].push_back( r );
         if( std::isfinite( r ) )
            taus.push_back( r );
      }
   }
   std::sort( taus.begin(), taus.end() );
   taus.erase( std::unique( taus.begin(), taus.end() ), taus.end() );
   std::vector<std::vector<ProfilePoint>> out( num_configs );
   const double total = static_cast<double>( times.size() );
   for( std::size_t c = 0; c < num_configs; ++c )
      for( double tau : taus )
      {
         auto k = std::count_if( ratios[c].begin(), ratios[c].end(),
                                 [tau]( double r ) { return r <= tau; } );
         out[c].push_back( { tau, static_cast<double>( k ) / total } );
      }
   return out;
}

struct BenchManifest
{
   std::vector<std::string> instances;
   std::vector<std::string> config_names;
   std::vector<SolverConfig> configs;
};

/// {"instances": [paths], "configs": [{"name": ..., solver keys}],
///  "defaults": {solver keys}}; relative paths resolve against base_dir.
inline BenchManifest
parse_manifest( const json& j, const std::filesystem::path& base_dir )
{
   BenchManifest m;
   SolverConfig defaults;
   if( j.contains( "defaults" ) )
      defaults = config_from_json( j["defaults"] );
   if( j.contains( "instances" ) )
      for( const auto& p : j["instances"] )
      {
         std::filesystem::path path( p.get<std::string>() );
         if( path.is_relative() )
            path = base_dir / path;
         m.instances.push_back( path.string() );
      }
   if( j.contains( "configs" ) )
      for( const auto& c : j["configs"] )
      {
         m.config_names.push_back(
             c.value( "name", "config" + std::to_string( m.configs.size() + 1 ) ) );
         m.configs.push_back( config_from_json( c, defaults ) );
      }
   if( m.configs.empty() && !m.instances.empty() )
   {
      m.config_names.push_back( "default" );
      m.configs.push_back( defaults );
   }
   return m;
}

inline int
thread_cap( int requested )
{
   int cap = requested > 0 ? requested : 1;
   if( const char* env = std::getenv( "PSCP_THREADS" ) )
   {
      int v = std::atoi( env );
      if( v > 0 )
         cap = requested > 0 ? std::min( cap, v ) : v;
   }
   return std::max( cap, 1 );
}

struct SolverFlags
{
   std::string mode = "bd";
   bool no_initial_cuts = false;
   bool no_mir = false;
   bool no_rens = false;
   double theta = 0.01;
   double time_limit = std::numeric_limits<double>::infinity();
   long node_limit = std::numeric_limits<long>::max();
   double gap_tol = 0.0;
   std::optional<double> reference;

   void
   attach( CLI::App& app )
   {
      app.add_option( "--mode", mode, "separation policy" )
          ->check( CLI::IsMember( { "bd", "rbd" } ) );
      app.add_flag( "--no-initial-cuts", no_initial_cuts );
      app.add_flag( "--no-mir", no_mir );
      app.add_flag( "--no-rens", no_rens );
      app.add_option( "--theta", theta, "RENS fixing threshold" );
      app.add_option( "--time-limit", time_limit, "seconds" );
      app.add_option( "--node-limit", node_limit );
      app.add_option( "--gap-tol", gap_tol, "relative gap in percent" );
      app.add_option( "--reference", reference,
                      "known optimum for the RENS primal gap" );
   }

   SolverConfig
   config() const
   {
      SolverConfig c;
      c.mode = mode == "bd" ? SeparationMode::bd : SeparationMode::rbd;
      c.use_initial_cuts = !no_initial_cuts;
      c.use_mir = !no_mir;
      c.use_rens = !no_rens;
      c.rens_theta = theta;
      c.time_limit_s = time_limit;
      c.node_limit = node_limit;
      c.gap_tol = gap_tol;
      c.reference_objective = reference;
      c.check();
      return c;
   }
};

inline int
cmd_generate( const std::string& orlib, const std::string& out_path,
              GenConfig gen, std::ostream& out, std::ostream& err )
{
   std::vector<std::string> warnings;
   DeterministicScp scp = parse_orlib( read_file( orlib ), &warnings );
   for( const auto& w : warnings )
      err << "warning: " << w << "\n";
   Instance inst = generate( scp, gen );
   write_file( out_path, write_instance( inst ) );
   std::size_t total = 0;
   for( const auto& b : inst.blocks )
      total += b.scenarios.size();
   json j;
   j["schema"] = schema_version;
   j["kind"] = "generate";
   j["out"] = out_path;
   j["m"] = inst.m;
   j["n"] = inst.n;
   j["scenarios"] = total;
   j["meta"] = inst.meta;
   out << j.dump() << "\n";
   return exit_ok;
}

inline int
cmd_solve( const std::string& path, const SolverConfig& cfg, bool pretty,
           const std::string& log_path, std::ostream& out )
{
   Instance inst = read_instance( read_file( path ) );
   SolverConfig c = cfg;
   c.record_log = !log_path.empty();
   SolveReport r = solve( inst, c );
   json rec = run_record( instance_name( path ), "", cfg, r );
   if( pretty )
      out << pretty_header() << pretty_row( rec );
   else
      out << rec.dump() << "\n";
   if( !log_path.empty() )
   {
      std::ostringstream log;
      for( const LogEvent& e : r.log )
      {
         json ev;
         ev["schema"] = schema_version;
         ev["kind"] = "event";
         ev["t"] = e.time;
         ev["event"] = e.kind;
         ev["node"] = e.node;
         ev["value"] = number( e.value );
         ev["detail"] = e.detail;
         log << ev.dump() << "\n";
      }
      write_file( log_path, log.str() );
   }
   return exit_code_for( r.status );
}

inline int
cmd_oracle( const std::string& path, std::ostream& out )
{
   OracleResult r = brute_force( read_instance( read_file( path ) ) );
   out << format_oracle( r ) << "\n";
   return r.feasible ? exit_ok : exit_infeasible;
}

inline int
cmd_export( const std::string& path, bool relax_z, const std::string& out_path,
            std::ostream& out )
{
   std::string text = export_bigm( read_instance( read_file( path ) ), relax_z );
   if( out_path.empty() || out_path == "-" )
      out << text;
   else
      write_file( out_path, text );
   return exit_ok;
}

/// Runs every (instance, config) pair; records come back in manifest order.
inline std::vector<json>
bench_records( const BenchManifest& m, int threads,
               std::vector<std::vector<double>>* solved_times = nullptr )
{
   const std::size_t nc = m.configs.size();
   const std::size_t total = m.instances.size() * nc;
   std::vector<json> records( total );
   std::vector<double> times( total, std::numeric_limits<double>::infinity() );
   std::atomic<std::size_t> next{ 0 };
   auto worker = [&]() {
      for( std::size_t k; ( k = next.fetch_add( 1 ) ) < total; )
      {
         const std::string& path = m.instances[k / nc];
         const std::string name = instance_name( path );
         try
         {
            Instance inst = read_instance( read_file( path ) );
            SolveReport r = solve( inst, m.configs[k % nc] );
            records[k] = run_record( name, m.config_names[k % nc],
                                     m.configs[k % nc], r );
            if( r.status == SolveStatus::optimal )
               times[k] = r.wall_time;
         }
         catch( const std::exception& e )
         {
            records[k] = error_record( name, m.config_names[k % nc], e.what() );
         }
      }
   };
   std::vector<std::thread> pool;
   for( int t = 1; t < threads; ++t )
      pool.emplace_back( worker );
   worker();
   for( auto& t : pool )
      t.join();
   if( solved_times )
   {
      solved_times->assign( m.instances.size(), std::vector<double>( nc ) );
      for( std::size_t k = 0; k < total; ++k )
         ( *solved_times )[k / nc][k % nc] = times[k];
   }
   return records;
}

inline int
cmd_bench( const std::string& manifest_path, int parallel, bool pretty,
           std::ostream& out )
{
   json j = json::parse( read_file( manifest_path ) );
   BenchManifest m = parse_manifest(
       j, std::filesystem::path( manifest_path ).parent_path() );
   std::vector<std::vector<double>> times;
   std::vector<json> records = bench_records( m, thread_cap( parallel ), &times );
   if( pretty && !records.empty() )
      out << pretty_header();
   for( const json& r : records )
      out << ( pretty ? pretty_row( r ) : r.dump() + "\n" );
   auto profiles = performance_profile( times, m.configs.size() );
   if( m.instances.empty() )
      return exit_ok;
   for( std::size_t c = 0; c < m.configs.size(); ++c )
   {
      json p;
      p["schema"] = schema_version;
      p["kind"] = "profile";
      p["config_name"] = m.config_names[c];
      p["metric"] = "time";
      p["points"] = json::array();
      for( const ProfilePoint& pt : profiles[c] )
         p["points"].push_back( { pt.tau, pt.fraction } );
      out << p.dump() << "\n";
   }
   return exit_ok;
}

/// Entry point shared by the executable and the tests; `args` excludes the
/// program name.
inline int
run( const std::vector<std::string>& args, std::ostream& out,
     std::ostream& err )
{
   CLI::App app{ "Probabilistic set covering by branch-and-Benders-cut",
                 "pscp" };
   app.require_subcommand( 1 );

   auto* gen = app.add_subcommand( "generate", "sample scenarios for an ORLIB SCP" );
   std::string orlib, gen_out, dist = "indep";
   GenConfig gcfg;
   int s = 100;
   gen->add_option( "orlib", orlib, "ORLIB SCP file" )->required();
   gen->add_option( "out", gen_out, "instance file to write" )->required();
   gen->add_option( "--dist", dist )
       ->check( CLI::IsMember( { "indep", "mixture" } ) );
   gen->add_option( "--s", s, "scenarios per row" );
   gen->add_option( "--eps", gcfg.epsilon );
   gen->add_option( "--L", gcfg.mixture_L, "mixture components" );
   gen->add_option( "--seed", gcfg.seed );
   gen->add_option( "--dropout-hi", gcfg.dropout_hi );
   gen->add_option( "--workers", gcfg.workers );

   auto* sol = app.add_subcommand( "solve", "solve an instance file" );
   std::string inst_path, log_path;
   bool pretty = false;
   SolverFlags flags;
   sol->add_option( "instance", inst_path )->required();
   flags.attach( *sol );
   sol->add_flag( "--pretty", pretty );
   sol->add_option( "--log", log_path, "write structured events here" );

   auto* ora = app.add_subcommand( "oracle", "exhaustive reference solve" );
   ora->add_option( "instance", inst_path )->required();

   auto* exp = app.add_subcommand( "export", "write the big-M model as LP text" );
   bool relax_z = false;
   std::string exp_out;
   exp->add_option( "instance", inst_path )->required();
   exp->add_flag( "--relax-z", relax_z );
   exp->add_option( "-o,--out", exp_out );

   auto* ben = app.add_subcommand( "bench", "run a manifest of instances and configs" );
   std::string manifest;
   int parallel = 0;
   ben->add_option( "manifest", manifest )->required();
   ben->add_option( "--parallel", parallel, "worker count, capped by PSCP_THREADS" );
   ben->add_flag( "--pretty", pretty );

   std::vector<std::string> rev( args.rbegin(), args.rend() );
   try
   {
      app.parse( rev );
   }
   catch( const CLI::ParseError& e )
   {
      int code = app.exit( e, out, err );
      return code == 0 ? exit_ok : exit_error;
   }

   try
   {
      if( gen->parsed() )
      {
         gcfg.kind = dist == "indep" ? Distribution::independent
                                     : Distribution::mixture;
         gcfg.s = { s };
         return cmd_generate( orlib, gen_out, gcfg, out, err );
      }
      if( sol->parsed() )
         return cmd_solve( inst_path, flags.config(), pretty, log_path, out );
      if( ora->parsed() )
         return cmd_oracle( inst_path, out );
      if( exp->parsed() )
         return cmd_export( inst_path, relax_z, exp_out, out );
      if( ben->parsed() )
         return cmd_bench( manifest, parallel, pretty, out );
   }
   catch( const std::exception& e )
   {
      err << "error: " << e.what() << "\n";
      return exit_error;
   }
   return exit_error;
}

} // namespace pscp::cli

#endif
