// Copyright 2026 The wavepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "wavepipe/cli.hpp"

int main(int argc, char** argv) { return wavepipe::run_cli(argc, argv, std::cout, std::cerr); }
