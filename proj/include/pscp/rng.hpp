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

#ifndef PSCP_RNG_HPP
#define PSCP_RNG_HPP

#include <cstdint>
#include <initializer_list>

namespace pscp
{

/// Counter-based splittable generator.
///
/// A stream is identified by a key derived from (seed, purpose, indices);
/// its k-th output is the SplitMix64 finalizer applied to
/// key + k * 0x9E3779B97F4A7C15. Streams with different keys are
/// statistically independent, so work can be split by row or scenario
/// without changing results. This definition is part of the instance
/// generation contract and must not change between versions.
class Stream
{
 public:
   Stream( std::uint64_t seed, std::initializer_list<std::uint64_t> path )
       : key_( mix( seed ^ 0x6a09e667f3bcc909ULL ) )
   {
      for( std::uint64_t p : path )
         key_ = mix( key_ ^ mix( p + 0x3c6ef372fe94f82bULL ) );
   }

   std::uint64_t
   next()
   {
      ++counter_;
      return mix( key_ + counter_ * kGolden );
   }

   /// Uniform on [0, 1) with 53 random bits.
   double
   uniform()
   {
      return static_cast<double>( next() >> 11 ) * 0x1.0p-53;
   }

   /// Uniform on [0, hi).
   double
   uniform( double hi )
   {
      return hi * uniform();
   }

   /// Uniform integer in [lo, hi]; modulo bias is below 2^-40 for the
   /// ranges used here.
   std::int64_t
   uniform_int( std::int64_t lo, std::int64_t hi )
   {
      auto span = static_cast<std::uint64_t>( hi - lo ) + 1;
      return lo + static_cast<std::int64_t>( next() % span );
   }

   static std::uint64_t
   mix( std::uint64_t z )
   {
      z = ( z ^ ( z >> 30 ) ) * 0xbf58476d1ce4e5b9ULL;
      z = ( z ^ ( z >> 27 ) ) * 0x94d049bb133111ebULL;
      return z ^ ( z >> 31 );
   }

 private:
   static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
   std::uint64_t key_;
   std::uint64_t counter_ = 0;
};

/// Stream purposes.
enum class StreamTag : std::uint64_t
{
   dropout = 1,   ///< per (row, component): dropout probabilities
   scenario = 2,  ///< per (row, scenario): keep/drop draws
   component = 3, ///< per (row, scenario): mixture component choice
   prior = 4,     ///< mixture priors
   test = 99
};

inline Stream
make_stream( std::uint64_t seed, StreamTag tag, std::uint64_t a = 0,
             std::uint64_t b = 0 )
{
   return Stream( seed, { static_cast<std::uint64_t>( tag ), a, b } );
}

} // namespace pscp

#endif
