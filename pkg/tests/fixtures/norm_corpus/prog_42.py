def alpha28(beta28, gamma28=2):
    delta28 = beta28 * gamma28
    if delta28 > 4:
        return delta28
    return delta28 + 2
print(alpha28(28), alpha28(28, 3))
