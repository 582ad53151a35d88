alpha4 = 'alpha-4'
beta4 = alpha4.upper()
gamma4 = [ch for ch in beta4 if ch.isalpha()]
print(''.join(gamma4))
