red15 = 17
green15 = red15 + 3
def blue15(yellow15):
    return yellow15 - green15
print(blue15(red15))
