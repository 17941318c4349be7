def {{letter}}(score):
    # map a numeric score onto a letter grade
    if score >= 90:
        return "A"
    elif score >= 80:
        return "B"
    elif score >= 70:
        return "C"
    return "F"


def {{average}}({{scores}}):
    if len({{scores}}) == 0:
        return 0.0
    return sum({{scores}}) / len({{scores}})


def {{report}}(students):
    lines = []
    for name, {{scores}} in students.items():
        avg = {{average}}({{scores}})
        grade = {{letter}}(avg)
        lines.append(f"{name}: {avg:.1f} {grade}")
    lines.sort()
    return "\n".join(lines)


def main():
    students = {"ana": [91, 85], "bo": [72, 64], "cy": [88, 79]}
    print({{report}}(students))
