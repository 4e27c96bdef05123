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

#include "pscp/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

using namespace pscp;
using pscp::cli::json;
namespace fs = std::filesystem;

namespace
{

const std::string data_dir = PSCP_TEST_DATA;

std::string
data( const std::string& name )
{
   return data_dir + "/" + name;
}

struct Outcome
{
   int code;
   std::string out;
   std::string err;
};

Outcome
run( std::vector<std::string> args )
{
   std::ostringstream out, err;
   int code = cli::run( args, out, err );
   return { code, out.str(), err.str() };
}

class TempDir
{
 public:
   TempDir()
   {
      static int counter = 0;
      path_ = fs::temp_directory_path() /
              ( "pscp_cli_test_" + std::to_string( ::getpid() ) + "_" +
                std::to_string( counter++ ) );
      fs::create_directories( path_ );
   }
   ~TempDir() { fs::remove_all( path_ ); }

   std::string
   file( const std::string& name ) const
   {
      return ( path_ / name ).string();
   }

 private:
   fs::path path_;
};

/// Drops wall-clock fields, which are the only nondeterministic ones.
json
without_times( json j )
{
   j.erase( "time_s" );
   j.erase( "separation_time_s" );
   return j;
}

void
expect_json_near( const json& a, const json& b, const std::string& path = "" )
{
   if( a.is_number() && b.is_number() )
   {
      EXPECT_NEAR( a.get<double>(), b.get<double>(), 1e-9 ) << path;
      return;
   }
   ASSERT_EQ( a.type(), b.type() ) << path;
   if( a.is_object() )
   {
      ASSERT_EQ( a.size(), b.size() ) << path;
      for( auto it = a.begin(); it != a.end(); ++it )
      {
         ASSERT_TRUE( b.contains( it.key() ) ) << path << "." << it.key();
         expect_json_near( it.value(), b[it.key()], path + "." + it.key() );
      }
   }
   else if( a.is_array() )
   {
      ASSERT_EQ( a.size(), b.size() ) << path;
      for( std::size_t k = 0; k < a.size(); ++k )
         expect_json_near( a[k], b[k], path + "[" + std::to_string( k ) + "]" );
   }
   else
      EXPECT_EQ( a, b ) << path;
}

std::vector<json>
json_lines( const std::string& text )
{
   std::vector<json> out;
   std::istringstream in( text );
   for( std::string line; std::getline( in, line ); )
      if( !line.empty() )
         out.push_back( json::parse( line ) );
   return out;
}

} // namespace

TEST( CliGenerate, MatchesGoldenFiles )
{
   TempDir tmp;
   Outcome r = run( { "generate", data( "small.orlib" ), tmp.file( "a.pscp" ),
                  "--s", "5", "--eps", "0.2", "--seed", "3" } );
   ASSERT_EQ( r.code, 0 ) << r.err;
   EXPECT_EQ( cli::read_file( tmp.file( "a.pscp" ) ),
              cli::read_file( data( "small_indep_s5_seed3.pscp" ) ) );
   json rec = json::parse( r.out );
   EXPECT_EQ( rec["schema"], cli::schema_version );
   EXPECT_EQ( rec["m"], 3 );
   EXPECT_EQ( rec["scenarios"], 15 );

   r = run( { "generate", data( "small.orlib" ), tmp.file( "b.pscp" ), "--dist",
              "mixture", "--L", "3", "--s", "6", "--eps", "0.2", "--seed", "4" } );
   ASSERT_EQ( r.code, 0 ) << r.err;
   EXPECT_EQ( cli::read_file( tmp.file( "b.pscp" ) ),
              cli::read_file( data( "small_mixture_s6_seed4.pscp" ) ) );
}

TEST( CliGenerate, RepeatedRunsAreByteIdentical )
{
   TempDir tmp;
   std::vector<std::string> flags{ "--s", "40", "--eps", "0.1", "--seed", "7",
                                   "--workers", "3" };
   auto args = [&]( const std::string& out ) {
      std::vector<std::string> a{ "generate", data( "small.orlib" ), out };
      a.insert( a.end(), flags.begin(), flags.end() );
      return a;
   };
   ASSERT_EQ( run( args( tmp.file( "a.pscp" ) ) ).code, 0 );
   ASSERT_EQ( run( args( tmp.file( "b.pscp" ) ) ).code, 0 );
   EXPECT_EQ( cli::read_file( tmp.file( "a.pscp" ) ),
              cli::read_file( tmp.file( "b.pscp" ) ) );
}

TEST( CliGenerate, ZeroDropoutReproducesTheRows )
{
   TempDir tmp;
   ASSERT_EQ( run( { "generate", data( "small.orlib" ), tmp.file( "a.pscp" ),
                     "--dropout-hi", "0", "--s", "4" } )
                  .code,
              0 );
   Instance inst = read_instance( cli::read_file( tmp.file( "a.pscp" ) ) );
   DeterministicScp scp = parse_orlib( cli::read_file( data( "small.orlib" ) ) );
   for( int i = 0; i < inst.m; ++i )
      for( const auto& sc : inst.blocks[i].scenarios )
         EXPECT_EQ( sc, scp.rows[i] );
}

TEST( CliGenerate, Errors )
{
   TempDir tmp;
   Outcome r = run( { "generate", tmp.file( "missing.orlib" ), tmp.file( "a.pscp" ) } );
   EXPECT_EQ( r.code, cli::exit_error );
   EXPECT_NE( r.err.find( "cannot read" ), std::string::npos );
   std::ofstream( tmp.file( "bad.orlib" ) ) << "2 3 1 2";
   EXPECT_EQ( run( { "generate", tmp.file( "bad.orlib" ), tmp.file( "a.pscp" ) } ).code,
              cli::exit_error );
   EXPECT_EQ( run( { "generate", data( "small.orlib" ), tmp.file( "a.pscp" ),
                     "--dist", "gauss" } )
                  .code,
              cli::exit_error );
}

TEST( CliSolve, MatchesGoldenRecords )
{
   for( std::string name :
        { "tiny", "small_indep_s5_seed3", "small_mixture_s6_seed4" } )
   {
      Outcome r = run( { "solve", data( name + ".pscp" ) } );
      ASSERT_EQ( r.code, 0 ) << r.err;
      json rec = json::parse( r.out );
      EXPECT_TRUE( rec.contains( "time_s" ) );
      json golden = json::parse( cli::read_file( data( name + ".solve.json" ) ) );
      expect_json_near( without_times( rec ), golden, name );
   }
}

TEST( CliSolve, TinyInstanceIsOptimal )
{
   Outcome r = run( { "solve", data( "tiny.pscp" ) } );
   json rec = json::parse( r.out );
   EXPECT_EQ( rec["status"], "optimal" );
   EXPECT_EQ( rec["objective"], 2.0 );
   EXPECT_EQ( rec["x"], "11" );
}

TEST( CliSolve, ModesAgree )
{
   for( std::string name : { "small_indep_s5_seed3", "small_mixture_s6_seed4" } )
   {
      json bd = json::parse( run( { "solve", data( name + ".pscp" ), "--mode", "bd" } ).out );
      json rbd = json::parse(
          run( { "solve", data( name + ".pscp" ), "--mode", "rbd", "--no-mir",
                 "--no-rens", "--no-initial-cuts" } )
              .out );
      EXPECT_EQ( bd["objective"], rbd["objective"] );
      EXPECT_EQ( rbd["config"]["mode"], "rbd" );
      EXPECT_EQ( rbd["config"]["mir"], false );
      EXPECT_EQ( rbd["cuts"]["initial"], 0 );
   }
}

TEST( CliSolve, TimeLimitReportsLimit )
{
   TempDir tmp;
   std::ostringstream orlib;
   const int m = 40, n = 150;
   orlib << m << " " << n << "\n";
   for( int j = 0; j < n; ++j )
      orlib << 1 + ( j * 37 ) % 50 << " ";
   for( int i = 0; i < m; ++i )
   {
      orlib << "\n10";
      for( int k = 0; k < 10; ++k )
         orlib << " " << 1 + ( i * 13 + k * 17 ) % n;
   }
   std::ofstream( tmp.file( "big.orlib" ) ) << orlib.str();
   ASSERT_EQ( run( { "generate", tmp.file( "big.orlib" ), tmp.file( "big.pscp" ),
                     "--s", "300", "--seed", "1" } )
                  .code,
              0 );
   Outcome r = run( { "solve", tmp.file( "big.pscp" ), "--time-limit", "0.001" } );
   EXPECT_EQ( r.code, cli::exit_limit );
   json rec = json::parse( r.out );
   EXPECT_EQ( rec["status"], "limit" );
   ASSERT_FALSE( rec["end_gap"].is_null() );
   EXPECT_GE( rec["end_gap"].get<double>(), 0.0 );
}

TEST( CliSolve, InfeasibleExitCode )
{
   TempDir tmp;
   Instance inst = read_instance( cli::read_file( data( "tiny.pscp" ) ) );
   inst.blocks[0] = make_block( 2, { {}, { 0 }, { 1 } }, { 0.2, 0.4, 0.4 }, 0.1 );
   cli::write_file( tmp.file( "inf.pscp" ), write_instance( inst ) );
   Outcome r = run( { "solve", tmp.file( "inf.pscp" ) } );
   EXPECT_EQ( r.code, cli::exit_infeasible );
   EXPECT_EQ( json::parse( r.out )["status"], "infeasible" );
   EXPECT_EQ( json::parse( r.out )["nodes"], 0 );
   r = run( { "oracle", tmp.file( "inf.pscp" ) } );
   EXPECT_EQ( r.code, cli::exit_infeasible );
   EXPECT_EQ( r.out, "infeasible\n" );
}

TEST( CliSolve, LogAndPrettyOutput )
{
   TempDir tmp;
   Outcome r = run( { "solve", data( "small_mixture_s6_seed4.pscp" ), "--pretty",
                  "--log", tmp.file( "run.log" ) } );
   ASSERT_EQ( r.code, 0 );
   EXPECT_EQ( r.out.rfind( "instance", 0 ), 0u );
   EXPECT_NE( r.out.find( "optimal" ), std::string::npos );
   auto events = json_lines( cli::read_file( tmp.file( "run.log" ) ) );
   ASSERT_FALSE( events.empty() );
   bool incumbent = false;
   for( const json& e : events )
   {
      EXPECT_EQ( e["kind"], "event" );
      incumbent = incumbent || e["event"] == "incumbent";
   }
   EXPECT_TRUE( incumbent );
}

TEST( CliSolve, RejectsBadInput )
{
   TempDir tmp;
   std::string text = cli::read_file( data( "tiny.pscp" ) );
   text[text.find( "0.4" )] = '7';
   cli::write_file( tmp.file( "bad.pscp" ), text );
   Outcome r = run( { "solve", tmp.file( "bad.pscp" ) } );
   EXPECT_EQ( r.code, cli::exit_error );
   EXPECT_NE( r.err.find( "checksum mismatch" ), std::string::npos );
   EXPECT_EQ( run( { "solve", data( "tiny.pscp" ), "--mode", "xyz" } ).code,
              cli::exit_error );
   EXPECT_EQ( run( { "solve", data( "tiny.pscp" ), "--theta", "0.9" } ).code,
              cli::exit_error );
   EXPECT_EQ( run( {} ).code, cli::exit_error );
}

TEST( CliOracle, GoldenOutputs )
{
   Outcome r = run( { "oracle", data( "tiny.pscp" ) } );
   EXPECT_EQ( r.code, 0 );
   EXPECT_EQ( r.out, "2 11\n" );
   EXPECT_EQ( run( { "oracle", data( "small_indep_s5_seed3.pscp" ) } ).out,
              cli::read_file( data( "small_indep_s5_seed3.oracle.txt" ) ) );
}

TEST( CliOracle, RefusesLargeInstances )
{
   TempDir tmp;
   Instance inst;
   inst.n = 30;
   inst.m = 1;
   inst.cost.assign( 30, 1.0 );
   inst.blocks.push_back( make_block( 30, { { 0, 5 } }, { 1.0 }, 0.5 ) );
   cli::write_file( tmp.file( "wide.pscp" ), write_instance( inst ) );
   Outcome r = run( { "oracle", tmp.file( "wide.pscp" ) } );
   EXPECT_EQ( r.code, cli::exit_error );
   EXPECT_NE( r.err.find( "refused" ), std::string::npos );
}

TEST( CliExport, GoldenOutputs )
{
   EXPECT_EQ( run( { "export", data( "tiny.pscp" ) } ).out,
              cli::read_file( data( "tiny.lp" ) ) );
   Outcome relaxed = run( { "export", data( "tiny.pscp" ), "--relax-z" } );
   EXPECT_EQ( relaxed.out, cli::read_file( data( "tiny_relaxed.lp" ) ) );
   EXPECT_NE( relaxed.out.find( "Bounds\n" ), std::string::npos );

   TempDir tmp;
   EXPECT_EQ( run( { "export", data( "tiny.pscp" ), "-o", tmp.file( "m.lp" ) } ).code, 0 );
   EXPECT_EQ( cli::read_file( tmp.file( "m.lp" ) ), cli::read_file( data( "tiny.lp" ) ) );
}

TEST( CliBench, RecordsAndProfiles )
{
   TempDir tmp;
   json manifest = {
       { "instances",
         { data( "tiny.pscp" ), data( "small_indep_s5_seed3.pscp" ),
           data( "small_mixture_s6_seed4.pscp" ) } },
       { "configs",
         { { { "name", "full" } },
           { { "name", "plain" }, { "initial_cuts", false }, { "mir", false } } } } };
   cli::write_file( tmp.file( "m.json" ), manifest.dump() );
   Outcome r = run( { "bench", tmp.file( "m.json" ), "--parallel", "1" } );
   ASSERT_EQ( r.code, 0 ) << r.err;
   auto lines = json_lines( r.out );
   ASSERT_EQ( lines.size(), 8u );
   const char* order[] = { "tiny", "tiny", "small_indep_s5_seed3",
                           "small_indep_s5_seed3", "small_mixture_s6_seed4",
                           "small_mixture_s6_seed4" };
   for( int k = 0; k < 6; ++k )
   {
      EXPECT_EQ( lines[k]["kind"], "run" );
      EXPECT_EQ( lines[k]["instance"], order[k] );
      EXPECT_EQ( lines[k]["config_name"], k % 2 ? "plain" : "full" );
      EXPECT_EQ( lines[k]["status"], "optimal" );
   }
   for( int k = 6; k < 8; ++k )
   {
      EXPECT_EQ( lines[k]["kind"], "profile" );
      double last_tau = 0.0, last_frac = 0.0;
      for( const auto& pt : lines[k]["points"] )
      {
         EXPECT_GE( pt[0].get<double>(), last_tau );
         EXPECT_GE( pt[1].get<double>(), last_frac );
         last_tau = pt[0].get<double>();
         last_frac = pt[1].get<double>();
      }
      EXPECT_DOUBLE_EQ( last_frac, 1.0 );
   }

   Outcome par = run( { "bench", tmp.file( "m.json" ), "--parallel", "4" } );
   auto plines = json_lines( par.out );
   ASSERT_EQ( plines.size(), lines.size() );
   for( int k = 0; k < 6; ++k )
      EXPECT_EQ( without_times( plines[k] ), without_times( lines[k] ) );
}

TEST( CliBench, EmptyManifest )
{
   TempDir tmp;
   cli::write_file( tmp.file( "m.json" ), R"({"instances": [], "configs": []})" );
   Outcome r = run( { "bench", tmp.file( "m.json" ) } );
   EXPECT_EQ( r.code, 0 );
   EXPECT_EQ( r.out, "" );
}

TEST( CliBench, FailingRunIsIsolated )
{
   TempDir tmp;
   json manifest = { { "instances", { tmp.file( "missing.pscp" ), data( "tiny.pscp" ) } } };
   cli::write_file( tmp.file( "m.json" ), manifest.dump() );
   Outcome r = run( { "bench", tmp.file( "m.json" ) } );
   EXPECT_EQ( r.code, 0 );
   auto lines = json_lines( r.out );
   ASSERT_EQ( lines.size(), 3u );
   EXPECT_EQ( lines[0]["status"], "error" );
   EXPECT_EQ( lines[1]["status"], "optimal" );
}

TEST( PerformanceProfile, Definition )
{
   const double inf = std::numeric_limits<double>::infinity();
   auto p = cli::performance_profile( { { 1.0, 2.0 }, { 4.0, 2.0 }, { inf, 3.0 } }, 2 );
   // ratios: config 0 -> 1, 2, inf; config 1 -> 2, 1, 1
   ASSERT_EQ( p[0].size(), 2u );
   EXPECT_EQ( p[0][0].tau, 1.0 );
   EXPECT_DOUBLE_EQ( p[0][0].fraction, 1.0 / 3 );
   EXPECT_DOUBLE_EQ( p[0][1].fraction, 2.0 / 3 );
   EXPECT_DOUBLE_EQ( p[1][0].fraction, 2.0 / 3 );
   EXPECT_DOUBLE_EQ( p[1][1].fraction, 1.0 );
}

TEST( ThreadCap, EnvironmentCapsParallelism )
{
   ::setenv( "PSCP_THREADS", "2", 1 );
   EXPECT_EQ( cli::thread_cap( 8 ), 2 );
   EXPECT_EQ( cli::thread_cap( 1 ), 1 );
   EXPECT_EQ( cli::thread_cap( 0 ), 2 );
   ::unsetenv( "PSCP_THREADS" );
   EXPECT_EQ( cli::thread_cap( 0 ), 1 );
   EXPECT_EQ( cli::thread_cap( 3 ), 3 );
}
