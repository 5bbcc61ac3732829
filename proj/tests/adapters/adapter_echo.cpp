// Protocol fixture: consumes one request line, answers "holds".
#include <iostream>
#include <string>

int main() {
    std::string line;
    std::getline(std::cin, line);
    if (line.empty()) return 1;
    std::cout << "{\"verdict\":\"holds\",\"stats\":{\"request_bytes\":" << line.size() << "}}"
              << std::endl;
    return 0;
}
