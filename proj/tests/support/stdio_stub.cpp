// Line-protocol adapter stub for tests. Modes:
//   empty            -> {"actions":[]}
//   garbage          -> a non-JSON line
//   delay <ms>       -> sleeps before answering
//   launch <id> <tg> -> one LAUNCH action by <id> at <tg>
#include <chrono>
#include <iostream>
#include <string>
#include <thread>

int main(int argc, char** argv) {
    const std::string mode = argc > 1 ? argv[1] : "empty";
    std::string line;
    while (std::getline(std::cin, line)) {
        if (mode == "delay") {
            const int ms = argc > 2 ? std::stoi(argv[2]) : 3000;
            std::this_thread::sleep_for(std::chrono::milliseconds(ms));
            std::cout << "{\"actions\":[]}" << std::endl;
        } else if (mode == "garbage") {
            std::cout << "this is not json" << std::endl;
        } else if (mode == "launch") {
            const std::string actor = argc > 2 ? argv[2] : "AAT-01";
            const std::string target = argc > 3 ? argv[3] : "B-01";
            std::cout << "{\"actions\":[{\"actor_id\":\"" << actor
                      << "\",\"t_start\":0.0,\"kind\":\"LAUNCH\",\"weapon\":\"sam\","
                         "\"target_id\":\""
                      << target << "\"}]}"
                      << std::endl;
        } else {
            std::cout << "{\"actions\":[]}" << std::endl;
        }
    }
    return 0;
}
