#include "lesvote/error.hpp"
#include "lesvote/signal.hpp"

namespace lesvote::signal {

BlockSplit split_blocks(const SpectrumMatrix& spec, std::size_t block_width) {
  require(block_width >= 1, ErrorKind::blocking, "block width must be positive");
  require(spec.cols() % block_width == 0, ErrorKind::blocking,
          "spectrum has " + std::to_string(spec.cols()) + " columns, not divisible by block width " +
              std::to_string(block_width));

  BlockSplit split;
  split.scheme.block_width = block_width;
  split.scheme.num_blocks = spec.cols() / block_width;
  split.scheme.delta_f =
      (spec.freq_end() - spec.freq_start()) / static_cast<double>(split.scheme.num_blocks);

  split.blocks.reserve(split.scheme.num_blocks);
  for (std::size_t b = 0; b < split.scheme.num_blocks; ++b) {
    SpectralBlock block;
    block.index = b;
    block.freq_lo = spec.freq_start() + static_cast<double>(b) * split.scheme.delta_f;
    block.freq_hi = b + 1 == split.scheme.num_blocks
                        ? spec.freq_end()
                        : spec.freq_start() + static_cast<double>(b + 1) * split.scheme.delta_f;
    block.data = spec.data().column_slice(b * block_width, block_width);
    split.blocks.push_back(std::move(block));
  }
  return split;
}

}  // namespace lesvote::signal
