#pragma once

namespace nloc::cli {

/// 0 success, 1 verification failure, 2 usage error.
int run(int argc, char** argv);

}  // namespace nloc::cli
