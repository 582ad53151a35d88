red7 = {}
for green7 in range(4):
    red7[green7] = green7 * 7
blue7 = sorted(red7.values())
print(blue7)
