#include <iostream>

#include "app/app.hpp"

int main(int argc, char** argv) { return iikl::app::run(argc, argv, std::cout, std::cerr); }
