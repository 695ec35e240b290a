// Template pack, version 1. The bodies below are the fixed prompt texts the
// renderers compose; tests/golden/ pins their rendered bytes.

#include "prompt_assets.hpp"

#include <string_view>
#include <utility>

namespace tidyloop {
namespace assets {
namespace {

std::string block(std::string_view raw) {
  std::string text(raw);
  if (!text.empty() && text.front() == '\n') text.erase(0, 1);
  while (!text.empty() && text.back() == '\n') text.pop_back();
  return text;
}

}  // namespace

const int kTemplatePackVersion = 1;

const std::map<std::string, TemplateSource>& template_sources() {
  static const std::map<std::string, TemplateSource> sources = [] {
    std::map<std::string, TemplateSource> out;
    auto add = [&out](const char* id, std::string body,
                      std::set<std::string> slots) {
      out.emplace(id, TemplateSource{id, std::move(body), std::move(slots)});
    };

    add("initial_description",
        block(R"TL(
These are the objects on the desk: {objects}.
)TL"),
        {"objects"});

    add("question_instruction",
        block(R"TL(
These are the objects on the desk: {objects}.

Your goal is to tidy the desk in a socially appropriate manner. Ask a new follow-up question about each object to gather more information. Only ask questions that can be answered by taking a picture of the object. For example, DO NOT ask whether the object is currently being used.
)TL"),
        {"objects"});

    add("question_example",
        block(R"TL(
These are the objects on the desk: `apple`, `charging cable`, `empty water bottle`, `book`, `calendar`, `coffee cup`.

Your goal is to tidy the desk in a socially appropriate manner. Ask a new follow-up question about each object to gather more information. Only ask questions that can be answered by taking a picture of the object. For example, DO NOT ask whether the object is currently being used.

-`Apple`:
Socially motivated reasoning: You should throw away the `apple` if it is partially eaten, but not if it is intact.

Resulting question (that can be answered by taking a picture of object): Is the `apple` partially eaten?

(a) Yes (b) No (c) Cannot answer from image

-`Charging cable`:
Socially motivated reasoning: You should coil the `charging cable` and store it neatly if it is not in use, but leave it in place if it is connected to a device that needs charging.

Resulting question (that can be answered by taking a picture of object): Is the `charging cable` connected to a device?

(a) Yes (b) No (c) Cannot answer from image
)TL"),
        {});

    add("baseline_question",
        block(R"TL(
Ask one yes-or-no question for each object on the desk. Only ask yes-or-no questions that can be answered by taking a picture of the object.

These are the objects on the desk: {objects}.

Format your answer in the following format: `object_name`: question
)TL"),
        {"objects"});

    add("angle_examples",
        block(R"TL(
Description: These are the objects on the desk: `computer monitor`, `cup`, `computer wires`, `apple`.

Follow-up Question: Are the `computer wires` connected to anything? (a) Yes (b) No

You are instructing a robot to take a close-up picture of the object to help answer the follow-up question.

Which of the following angles would yield a close-up picture that can best answer the question?

(a) Top of the object
(b) Right side of the object
(c) Left side of the object
(d) Front of the object
(e) Behind the object

Response: A top-down view would give an unoccluded view since the wires might be tangled.

(a) Top of the object

Description: These are the objects on the desk: `monitor`, `stack of papers`, `cups`.

Follow-up Question: Are the `cups` empty? (a) Yes (b) No

You are instructing a robot to take a close-up picture of the object to help answer the follow-up question.

Which of the following angles would yield a close-up picture that can best answer the question?

(a) Top of the object
(b) Right side of the object
(c) Left side of the object
(d) Front of the object
(e) Behind the object

Response: The cups might be opaque so the best angle would be

(a) Top of the object

Description: These are the objects on the desk: `keyboard`, `whiteboard marker`, `stack of papers`, `vase`.

Follow-up Question: Are the `stack of papers` straightened? (a) Yes (b) No

You are instructing a robot to take a close-up picture of the object to help answer the follow-up question.

Which of the following angles would yield a close-up picture that can best answer the question?

(a) Top of the object
(b) Right side of the object
(c) Left side of the object
(d) Front of the object
(e) Behind the object

Response: The stack would best be viewed from its side.

(d) Front of the object
)TL"),
        {});

    add("angle_query",
        block(R"TL(
Description: These are the objects on the desk: {objects}.

Follow-up Question: {question} (a) Yes (b) No

You are instructing a robot to take a close-up picture of the object to help answer the follow-up question.

Which of the following angles would yield a close-up picture that can best answer the question?

(a) Top of the object
(b) Right side of the object
(c) Left side of the object
(d) Front of the object
(e) Behind the object

Response:
)TL"),
        {"objects", "question"});

    add("action_context_header",
        block(R"TL(
Here is some information about the `{object}` in question-answer format.
)TL"),
        {"object"});

    add("action_question",
        block(R"TL(
Based on the information above, what is the most appropriate way to tidy the `{object}`?

Choose the best option.
)TL"),
        {"object"});

    add("action_footer",
        block(R"TL(
The best option is:
)TL"),
        {});

    add("preference_suffix",
        block(R"TL(
The owner of the object has a preference on how you should tidy the `{object}`: {preference}
)TL"),
        {"object", "preference"});

    add("benchmark_q1",
        block(R"TL(
These are the objects on the desk: {objects}.

Your goal is to tidy each `object` up, but there is not enough information about each object. For each `object`, list 5 possible states the object could be in that would affect how you tidy it up.

Label the 5 states (a)-(e). Make sure each state is significantly different from each other. Remember that all the objects are placed on the desk.
)TL"),
        {"objects"});

    add("benchmark_q2",
        block(R"TL(
For each state (a)-(e), tell me how you would tidy the `object`. Make sure each answer choice is significantly different from each other. Include an option to 'leave the object as is'. Each object should be in apostrophes like so: `object`.
)TL"),
        {});

    add("codegen_api",
        block(R"TL(
Translate each of the following language instructions to a sequence of predefined API calls that will be executed by a robot manipulator to help "clean up" a workspace. When generating code, make sure to use the API provided below:

interface RobotManipulationInterface {
    // Leaves the <object> alone
    func leave_alone(object: str) -> None;

    // Sets the "designated receptacle" for
    // following actions --> *stateful*
    func set_designated(receptacle: str) -> None;

    // Relocates / gathers the <object> and moves it to the
    // designated receptacle
    func relocate(object: str) -> None;

    // Discards the <object> by placing it in the
    // designated receptacle
    func cleanup(object: str) -> None;

    // Signals end of execution
    func done() -> None;
}

// Create a `robot` (callable instance of interface)
robot = RobotManipulationInterface();

You can invoke a given function on the robot by calling `robot.<func>("object name"). For example: `robot.set_designated_area("recycling bin")`.

The API also enables multiple function invocations (separated by newlines).

Note that each call to `relocate` and `cleanup` *must* be preceded by a call to `set_designated` to be valid!

To terminate execution for a given action, call `robot.done()`.
)TL"),
        {});

    add("codegen_icl_instruction",
        block(R"TL(
Here are some examples of translating language instructions to API calls. Each instruction defines two variables:

1) a list of interactable `Objects: ["obj1", "obj2", ...]` --> these should be the only "object" arguments to the `relocate` and `cleanup` API calls!

2) a mapping of objects to receptacles `Receptacles: {"obj": {"relocate": "<receptacle>", "cleanup": "<receptacle>"}}` --> these should be the only "receptacle" arguments for the `set_designated` API calls!

Note that if there is *not* a good API call that reflects the desired behavior, it is ok to skip!
)TL"),
        {});

    add("codegen_example_one",
        block(R"TL(
Instruction: "Retrieve all the crayons and organize them tidily in the designated container."
Objects: ["crayons", "colored pencils", "notebook", "eraser", "crumpled up napkin"]
Receptacles: {
  "crayons": {"relocate": "art box", "cleanup": "trash"},
  "notebook": {"relocate": "desk", "cleanup": "recycling"},
  "eraser": {"relocate": "art box", "cleanup": "trash"},
  "crumpled up napkin": {"relocate": "desk", "cleanup": "trash"}
}
Program:
```
robot.set_designated("art box");
robot.relocate("crayons");
robot.done();
```
)TL"),
        {});

    add("codegen_example_two",
        block(R"TL(
Instruction: "Throw away the half-eaten apple."
Objects: ["apple", "orange", "half-eaten peach", "coffee cup", "pink plate"]
Receptacles: {
  "apple": {"relocate": "counter", "cleanup": "trash"},
  "orange": {"relocate": "counter", "cleanup": "trash"},
  "half-eaten peach": {"relocate": "counter", "cleanup": "trash"},
  "coffee cup": {"relocate": "counter", "cleanup": "recycling"},
  "pink plate": {"relocate": "counter", "cleanup": "sink"}
}
Program:
```
robot.set_designated("trash can");
robot.cleanup("apple");
robot.done();
```
)TL"),
        {});

    add("codegen_example_three",
        block(R"TL(
Instruction: "Leave the castle as is in a designated area, then put away the removeable parts in a continer."
Objects: ["toy castle", "castle parts", "figurine", "cheerios"]
Receptacles: {
  "toy castle": {"relocate": "shelf", "cleanup": "toy box"},
  "castle parts": {"relocate": "play mat", "cleanup": "toy box"},
  "figurine": {"relocate": "shelf", "cleanup": "toy box"},
  "cheerios": {"relocate": "play mat", "cleanup": "trash"}
}
Program:
```
robot.leave_alone("toy castle");
robot.set_designated("toy box");
robot.cleanup("castle parts");
robot.done();
```
)TL"),
        {});

    add("codegen_continuation",
        block(R"TL(
Instruction: {instruction}
Objects: {objects}
Receptacles: {receptacles}
Program:
```
)TL"),
        {"instruction", "objects", "receptacles"});

    add("vqa",
        block(R"TL(
Given the image, please answer the following question in yes, no, or unknown.
Question: {question}
Answer:
)TL"),
        {"question"});

    return out;
  }();
  return sources;
}

}  // namespace assets
}  // namespace tidyloop
